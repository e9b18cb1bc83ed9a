#pragma once

#include <tlsctl/bath.hpp>
#include <tlsctl/bloch.hpp>
#include <tlsctl/cg.hpp>
#include <tlsctl/control.hpp>
#include <tlsctl/csv.hpp>
#include <tlsctl/errors.hpp>
#include <tlsctl/optimizer.hpp>
#include <tlsctl/propagator.hpp>
#include <tlsctl/pulse.hpp>
#include <tlsctl/rates.hpp>
#include <tlsctl/rk4.hpp>
#include <tlsctl/robustness.hpp>
#include <tlsctl/scenario.hpp>
#include <tlsctl/validation.hpp>
