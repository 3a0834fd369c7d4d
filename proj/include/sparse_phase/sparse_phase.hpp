///
/// \file sparse_phase.hpp
///
/// Umbrella header for the numerical library (without the CLI layer).
///
#ifndef SPARSE_PHASE_SPARSE_PHASE_HPP
#define SPARSE_PHASE_SPARSE_PHASE_HPP

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/numerics.hpp>
#include <sparse_phase/splines.hpp>
#include <sparse_phase/synthesis.hpp>
#include <sparse_phase/prony.hpp>
#include <sparse_phase/retrieval.hpp>

#endif /* SPARSE_PHASE_SPARSE_PHASE_HPP */
