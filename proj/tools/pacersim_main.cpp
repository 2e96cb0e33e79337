/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#include "pacer/cli.hpp"

int main(int argc, char** argv) { return pacer::cli::dispatch(argc, argv); }
