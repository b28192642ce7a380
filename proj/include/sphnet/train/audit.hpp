// Copyright 2026 The sphnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sphnet/train/trainer.hpp"

namespace sphnet::train {

/// Rotation-robustness audit of a (randomly initialized) model:
///  (a) per-layer maximum relative deviation between activations on a cloud
///      and a rotated copy when both share the same kd order and patch
///      tables (isolates the network's own invariance),
///  (b) end-to-end prediction agreement when kd-trees and patches are
///      rebuilt per rotation (classification task only),
///  (c) first-layer raw-feature Wigner-equivariance residual, evaluated in
///      double precision.
struct InvarianceReport {
  std::vector<std::pair<std::string, double>> layer_deviation;
  double max_layer_deviation = 0.0;  // (a)
  double prediction_agreement = 0.0;  // (b); 1.0 when not applicable
  double wigner_residual = 0.0;       // (c)

  util::CsvTable to_csv() const;
};

InvarianceReport run_invariance_audit(const ExperimentConfig& config, int trials,
                                      int agreement_rotations);

}  // namespace sphnet::train
