#ifndef MSPEC_CONFIG_JSON_HPP
#define MSPEC_CONFIG_JSON_HPP

#include <json.hpp>

#include "mspec/learner.hpp"

namespace mspec {

// Flat-key JSON view of LearnConfig; manifests echo exactly this shape and a
// manifest's "config" object can be fed back as a config file.

inline nlohmann::json learn_config_to_json(const LearnConfig& c) {
  nlohmann::json j;
  j["k"] = c.k;
  j["d"] = c.d;
  j["epsilon"] = c.epsilon;
  j["moment_cutoff"] = c.moment_cutoff;
  j["degree_D"] = c.degree_D;
  j["c_degree"] = c.c_degree;
  j["n_subspace"] = c.n_subspace;
  j["n_regression"] = c.n_regression;
  j["sample_multiplier"] = c.sample_multiplier;
  j["seed"] = c.seed;
  j["eigen_tie_tol"] = c.eigen_tie_tol;
  j["degeneracy_threshold"] = c.degeneracy_threshold;
  j["noise_sigma"] = c.noise_sigma;
  j["threads"] = c.threads;
  return j;
}

inline void learn_config_from_json(const nlohmann::json& j, LearnConfig& c) {
  c.k = j.value("k", c.k);
  c.d = j.value("d", c.d);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.moment_cutoff = j.value("moment_cutoff", c.moment_cutoff);
  c.degree_D = j.value("degree_D", c.degree_D);
  c.c_degree = j.value("c_degree", c.c_degree);
  c.n_subspace = j.value("n_subspace", c.n_subspace);
  c.n_regression = j.value("n_regression", c.n_regression);
  c.sample_multiplier = j.value("sample_multiplier", c.sample_multiplier);
  c.seed = j.value("seed", c.seed);
  c.eigen_tie_tol = j.value("eigen_tie_tol", c.eigen_tie_tol);
  c.degeneracy_threshold = j.value("degeneracy_threshold", c.degeneracy_threshold);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.threads = j.value("threads", c.threads);
}

}  // namespace mspec

#endif
