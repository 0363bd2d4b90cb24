#pragma once

#include "gridlay/feature_grid.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gridlay {

/// A little-endian float32, C-ordered array as stored in an NPY v1.0 file.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  friend bool operator==(const NpyArray&, const NpyArray&) = default;
};

/// NPY v1.0 bytes: magic, version 1.0, header length, a Python dict literal padded with
/// spaces and a newline to a multiple of 64 bytes, then the payload.
std::string encode_npy(const NpyArray& array);

/// Accepts v1.0 to v3.0 headers with descr '<f4' and fortran_order False.
NpyArray decode_npy(const std::string& bytes);

void write_npy(const std::string& path, const NpyArray& array);
NpyArray read_npy(const std::string& path);

/// `{"mask_rle": [...], "assignment": [[x,y],...], "pooled_cells": [[x,y],...], "graph_label": int|null}`.
/// mask_rle alternates run lengths over the row-major mask, starting with unoccupied cells.
std::string grid_sidecar_json(const FeatureGrid& grid);

/// Writes `<stem>.npy` and `<stem>.json`.
void export_npy(const FeatureGrid& grid, const std::string& stem);

/// Rebuilds a FeatureGrid from the tensor and its sidecar.
FeatureGrid import_npy(const std::string& stem);
FeatureGrid parse_feature_grid(const std::string& npy_bytes, const std::string& sidecar_json);

/// `<dataset>_<graph_id>_<seed>`
std::string export_stem(const std::string& dataset, std::size_t graph_id, std::uint64_t seed);

} // namespace gridlay
