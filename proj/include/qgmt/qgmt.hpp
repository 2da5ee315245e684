#pragma once

#include "qgmt/assignment.hpp"
#include "qgmt/brute_force.hpp"
#include "qgmt/chains.hpp"
#include "qgmt/domain.hpp"
#include "qgmt/errors.hpp"
#include "qgmt/generators.hpp"
#include "qgmt/linalg.hpp"
#include "qgmt/lp.hpp"
#include "qgmt/multisection.hpp"
#include "qgmt/polynomial.hpp"
#include "qgmt/qfield.hpp"
#include "qgmt/qpoint.hpp"
#include "qgmt/reparam.hpp"
#include "qgmt/reparam_checks.hpp"
#include "qgmt/rng.hpp"
#include "qgmt/runner.hpp"
#include "qgmt/scenario_bank.hpp"
#include "qgmt/serialization.hpp"
#include "qgmt/suites.hpp"
