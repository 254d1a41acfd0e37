#pragma once

#include "magnomech/error.hpp"
#include "magnomech/core_model.hpp"
#include "magnomech/gaussian.hpp"
#include "magnomech/mean_field.hpp"
#include "magnomech/dynamics.hpp"
#include "magnomech/measures.hpp"
#include "magnomech/sweep.hpp"
#include "magnomech/io.hpp"
#include "magnomech/cli.hpp"
