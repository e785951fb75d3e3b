#pragma once

#include "ttno/optimizer.hpp"

#include <gtest/gtest.h>

/// Turns on the optimizer's runtime assertions for the whole test binary.
class InvariantEnv : public ::testing::Environment {
public:
  void SetUp() override { ttno::set_invariant_checks({true, true}); }
};

inline const auto *const kInvariantEnv =
    ::testing::AddGlobalTestEnvironment(new InvariantEnv);
