#pragma once

#include "lietx/coefficient.hpp"
#include "lietx/exponent.hpp"
#include "lietx/series.hpp"
#include "lietx/field.hpp"
#include "lietx/image.hpp"
#include "lietx/graded.hpp"
#include "lietx/lie.hpp"
#include "lietx/represent.hpp"
#include "lietx/normalform.hpp"
#include "lietx/oracle.hpp"
#include "lietx/io.hpp"
