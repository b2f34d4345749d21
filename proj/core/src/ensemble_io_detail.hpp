/*
 * Copyright 2026 The cwishart Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>

#include "cwishart/montecarlo.hpp"

namespace cwishart::detail {

/// Write chunk-%04d.bin with little-endian doubles.
void write_chunk_file(const std::filesystem::path& dir, std::size_t index,
                      std::span<const double> values);

/// Write meta.json describing an ensemble directory.
void write_meta_file(const std::filesystem::path& dir, const EnsembleMeta& meta,
                     std::size_t chunk_size);

}  // namespace cwishart::detail
