// Copyright (c) 2026 The fairot authors.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace fairot {

// Malformed or inconsistent input data (files, schemas, records).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command-line level misuse.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A library invariant failed to hold; indicates a bug, not bad input.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace fairot
