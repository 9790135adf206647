#pragma once

#include "errors.hpp"
#include "rational.hpp"
#include "arithmetic.hpp"
#include "qseries.hpp"
#include "forms.hpp"
#include "real.hpp"
#include "lseries.hpp"
#include "adjoint.hpp"
#include "form_spec.hpp"
#include "evaluation.hpp"
#include "petersson.hpp"
#include "spaces.hpp"
#include "verification.hpp"
