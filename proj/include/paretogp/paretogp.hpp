#pragma once

/// @file paretogp.hpp
/// @brief Umbrella header for the paretogp library.

#include "analysis.hpp"
#include "data_pipeline.hpp"
#include "dataset.hpp"
#include "ensemble.hpp"
#include "evolution.hpp"
#include "expression.hpp"
#include "fitness.hpp"
#include "interval.hpp"
#include "pareto.hpp"
#include "serialization.hpp"
#include "synthetic.hpp"
#include "text.hpp"
#include "variation.hpp"
