// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#include "rcheck/cli.hpp"

int main(int argc, char** argv) { return rcheck::cli::run(argc, argv); }
