// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <Eigen/Core>

namespace fairot {

using Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using ArrayXd = ArrayX<double>;

template <typename Scalar>
ArrayX<Scalar> cumulative_sum(const ArrayX<Scalar>& values) {
  ArrayX<Scalar> out(values.size());
  Scalar running = Scalar(0);
  for (Index i = 0; i < values.size(); ++i) {
    running += values(i);
    out(i) = running;
  }
  return out;
}

}  // namespace fairot
