// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The bfr Authors
#pragma once

#include <span>

#include "bfr/core.hpp"

namespace bfr::fft {

// Unnormalized DFTs: forward uses e^{-2 pi i nk/N}, backward e^{+2 pi i nk/N}.
// Out-of-place; in and out must not alias. Thread-safe.
void forward(std::span<const cplx> in, std::span<cplx> out);
void backward(std::span<const cplx> in, std::span<cplx> out);

}  // namespace bfr::fft
