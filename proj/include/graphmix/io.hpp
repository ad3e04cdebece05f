#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "graphmix/fitting.hpp"
#include "graphmix/graph.hpp"
#include "graphmix/netinf.hpp"
#include "graphmix/samplers.hpp"

// File formats: graph sets and observation sets are JSON with 1-indexed
// vertices; tabular output (traces, experiment grids, model comparison)
// is CSV.  Loaders validate everything and throw std::runtime_error
// with the offending path and context in the message.

namespace graphmix {

// {"directed": bool, "loops": bool,
//  "graphs": [{"n": int, "edges": [[i, j], ...]}, ...]}
GraphSet load_graph_set(const std::string& path);
void save_graph_set(const GraphSet& gs, const std::string& path);

// {"n": int, "directed": true,
//  "slices": [[[0, 1, ...], ...], ...]}     (one adjacency matrix each)
ObservationSet load_observations(const std::string& path);
void save_observations(const ObservationSet& obs, const std::string& path);

std::string fit_result_to_json(const FitResult& fit);
void save_fit_result(const FitResult& fit, const std::string& path);

// "bernoulli(0.05)", "beta-bernoulli(0.5,0.5)",
// "dirichlet-categorical(0.5,0.5,0.5)"
GraphPrior parse_prior(const std::string& text);

// {"n": int, "conditions": [[density, reciprocity], ...],
//  "n_criterion": int, "fp": x, "fn": x, "slice_schedule": [...],
//  "priors": ["bernoulli(0.05)", ...],
//  optional "error_model": {"fp_a":..,"fp_b":..,"fn_a":..,"fn_b":..,
//                           "pooling": "global"|"per-source"},
//  optional "gibbs": {"chains":..,"burn_in":..,"draws":..,"thin":..,
//                     optional "fixed_rates": [fp, fn]}}
// "conditions" may instead be given crossed, as
//  "densities": [...] and "reciprocities": [...].
ExperimentDesign load_design(const std::string& path);

// step,density,reciprocity,connectedness — reciprocity blank when the
// graph has no edges.
void write_trace_csv(const ContagionTrace& trace, std::ostream& out);

// density,reciprocity,prior,n_slices,replicate,accuracy,
// inferred_density,psrf_density,psrf_fp,psrf_fn
void write_experiment_csv(const std::vector<ExperimentRow>& rows,
                          std::ostream& out);

// family,deviance,df,aic
void write_comparison_csv(const std::vector<ComparisonRow>& rows,
                          std::ostream& out);

}  // namespace graphmix
