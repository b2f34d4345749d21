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

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "cwishart/error.hpp"
#include "cwishart/montecarlo.hpp"
#include "ensemble_io_detail.hpp"

namespace cwishart {

namespace {

constexpr int format_version = 1;

std::filesystem::path chunk_path(const std::filesystem::path& dir,
                                 std::size_t index)
{
    char name[32];
    std::snprintf(name, sizeof name, "chunk-%04zu.bin", index);
    return dir / name;
}

std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::little) {
        return bits;
    } else {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) {
            out = (out << 8) | ((bits >> (8 * i)) & 0xFF);
        }
        return out;
    }
}

}  // namespace

namespace detail {

void write_chunk_file(const std::filesystem::path& dir, std::size_t index,
                      std::span<const double> values)
{
    const auto path = chunk_path(dir, index);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    for (double v : values) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

void write_meta_file(const std::filesystem::path& dir, const EnsembleMeta& meta,
                     std::size_t chunk_size)
{
    nlohmann::json j;
    j["format_version"] = format_version;
    j["c_hash"] = meta.c_hash;
    j["p"] = meta.p;
    j["n"] = meta.n;
    j["l"] = meta.l;
    j["count"] = meta.count;
    j["seed"] = meta.seed;
    j["dimension"] = meta.dimension();
    j["chunk_size"] = chunk_size;
    j["chunks"] = (meta.count + chunk_size - 1) / chunk_size;
    j["dtype"] = "float64-le";
    const auto path = dir / "meta.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

}  // namespace detail

void save_ensemble(const EigenvalueEnsemble& e,
                   const std::filesystem::path& dir, std::size_t chunk_size)
{
    chunk_size = std::max<std::size_t>(1, chunk_size);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create ensemble directory " + dir.string() +
                      ": " + ec.message());
    }
    const std::size_t dim = e.dimension();
    for (std::size_t start = 0, index = 0; start < e.count();
         start += chunk_size, ++index) {
        const std::size_t size = std::min(chunk_size, e.count() - start);
        detail::write_chunk_file(
            dir, index, std::span<const double>(e.data()).subspan(start * dim, size * dim));
    }
    detail::write_meta_file(dir, e.meta(), chunk_size);
}

EigenvalueEnsemble load_ensemble(const std::filesystem::path& dir)
{
    const auto meta_path = dir / "meta.json";
    std::ifstream in(meta_path);
    if (!in) {
        throw IoError("cannot open " + meta_path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("malformed " + meta_path.string() + ": " + ex.what());
    }
    EnsembleMeta meta;
    std::size_t chunks = 0;
    try {
        if (j.at("format_version").get<int>() != format_version) {
            throw IoError("unsupported ensemble format in " + meta_path.string());
        }
        meta.c_hash = j.at("c_hash").get<std::string>();
        meta.p = j.at("p").get<std::size_t>();
        meta.n = j.at("n").get<std::size_t>();
        meta.l = j.at("l").get<std::size_t>();
        meta.count = j.at("count").get<std::size_t>();
        meta.seed = j.at("seed").get<std::uint64_t>();
        chunks = j.at("chunks").get<std::size_t>();
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("malformed " + meta_path.string() + ": " + ex.what());
    }
    std::vector<double> data;
    data.reserve(meta.count * meta.dimension());
    for (std::size_t index = 0; index < chunks; ++index) {
        const auto path = chunk_path(dir, index);
        std::ifstream chunk(path, std::ios::binary);
        if (!chunk) {
            throw IoError("missing chunk " + path.string());
        }
        std::uint64_t bits = 0;
        while (chunk.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
            data.push_back(std::bit_cast<double>(to_little_endian(bits)));
        }
    }
    if (data.size() != meta.count * meta.dimension()) {
        throw IoError("ensemble in " + dir.string() +
                      " has inconsistent size (expected " +
                      std::to_string(meta.count * meta.dimension()) +
                      " values, found " + std::to_string(data.size()) + ")");
    }
    return EigenvalueEnsemble(std::move(meta), std::move(data));
}

}  // namespace cwishart
