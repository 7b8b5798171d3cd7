#pragma once

#include "asymptotics.hpp"
#include "constructions.hpp"
#include "cvt_analysis.hpp"
#include "errors.hpp"
#include "ifs_measure.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "word.hpp"
