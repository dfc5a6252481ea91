// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <Eigen/Dense>

#include "condgrad/constraint.hpp"

namespace condgrad {

// Exact Euclidean projections for the projected-gradient baselines. Only the
// l2 ball (radial), l1 ball and simplex (sorting-based thresholds) are
// supported; the other sets have no practical exact projection here.

Eigen::VectorXd project_l2(const Eigen::Ref<const Eigen::VectorXd>& x, double radius);

Eigen::VectorXd project_simplex(const Eigen::Ref<const Eigen::VectorXd>& x, double mass);

Eigen::VectorXd project_l1(const Eigen::Ref<const Eigen::VectorXd>& x, double radius);

/// Dispatch; throws UnsupportedConstraintError for n-support and nuclear.
Eigen::VectorXd project(const ConstraintSet& c, const Eigen::Ref<const Eigen::VectorXd>& x);

/// True when projected-gradient baselines can run on this set.
bool projection_supported(const ConstraintSet& c);

}  // namespace condgrad
