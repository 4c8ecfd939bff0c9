#pragma once

#include "plap/compare.hpp"
#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/expr.hpp"
#include "plap/families.hpp"
#include "plap/field.hpp"
#include "plap/io.hpp"
#include "plap/op.hpp"
#include "plap/problem.hpp"
#include "plap/solver.hpp"
#include "plap/verify.hpp"
