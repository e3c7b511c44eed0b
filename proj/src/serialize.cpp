#include "ossgan/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ossgan/errors.hpp"

namespace ossgan::io {

uint64_t fnv1a(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 14695981039346656037ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

uint64_t file_fnv1a(const std::string& path) { return fnv1a(read_text(path)); }

std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw DataError("truncated archive: " + path);
    return v;
}

}  // namespace

void save_archive(const std::string& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for write: " + path);
    os.write("OSTA", 4);
    put<uint32_t>(os, 1);
    put<uint32_t>(os, static_cast<uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put<uint32_t>(os, static_cast<uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<uint32_t>(os, static_cast<uint32_t>(t->shape().size()));
        for (int64_t d : t->shape()) put<int64_t>(os, d);
        os.write(reinterpret_cast<const char*>(t->data()),
                 static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(t->numel())));
    }
    if (!os) throw DataError("write failed: " + path);
}

std::map<std::string, Tensor> load_archive(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open archive: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "OSTA") throw DataError("bad archive magic: " + path);
    uint32_t version = get<uint32_t>(is, path);
    if (version != 1) throw DataError("unsupported archive version: " + path);
    uint32_t count = get<uint32_t>(is, path);
    std::map<std::string, Tensor> out;
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t name_len = get<uint32_t>(is, path);
        if (name_len > 4096) throw DataError("corrupt tensor name: " + path);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is) throw DataError("truncated archive: " + path);
        uint32_t rank = get<uint32_t>(is, path);
        if (rank > 8) throw DataError("corrupt tensor rank: " + path);
        std::vector<int64_t> dims(rank);
        for (auto& d : dims) {
            d = get<int64_t>(is, path);
            if (d < 0) throw DataError("corrupt tensor dims: " + path);
        }
        Tensor t(dims);
        is.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(t.numel())));
        if (!is) throw DataError("truncated archive: " + path);
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for write: " + path);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw DataError("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int64_t Csv::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int64_t>(i);
    return -1;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream ss;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) ss << ',';
        ss << columns[i];
    }
    ss << '\n';
    char buf[64];
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw ValidationError("csv row width mismatch: " + path);
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) ss << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            ss << buf;
        }
        ss << '\n';
    }
    write_text(path, ss.str());
}

Csv read_csv(const std::string& path) {
    std::istringstream is(read_text(path));
    Csv csv;
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty csv: " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) csv.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError("bad csv cell '" + cell + "' in " + path);
            }
        }
        if (!line.empty() && line.back() == ',')
            row.push_back(std::numeric_limits<double>::quiet_NaN());
        if (row.size() != csv.columns.size())
            throw DataError("csv row width mismatch: " + path);
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

}  // namespace ossgan::io
