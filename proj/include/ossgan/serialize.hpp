#pragma once

// Binary tensor archive, content hashing, and CSV logs.
//
// Archive layout (little-endian):
//   magic "OSTA" | u32 version=1 | u32 count
//   per tensor: u32 name_len | name bytes | u32 rank | i64 dims[rank]
//               | f64 data[numel]

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ossgan/tensor.hpp"

namespace ossgan::io {

uint64_t fnv1a(const void* data, size_t n);
uint64_t fnv1a(const std::string& s);
uint64_t file_fnv1a(const std::string& path);
std::string hash_hex(uint64_t h);

void save_archive(const std::string& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors);
std::map<std::string, Tensor> load_archive(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int64_t column_index(const std::string& name) const;  // -1 if absent
};

// doubles are written with %.17g so values round-trip exactly and identical
// runs produce identical bytes
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
Csv read_csv(const std::string& path);

}  // namespace ossgan::io
