#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "ossgan/errors.hpp"
#include "ossgan/rng.hpp"
#include "ossgan/serialize.hpp"

using namespace ossgan;

namespace {

std::string tmp_dir() {
    std::string d = "/tmp/ossgan_serialize_tests";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("fnv1a reproduces reference digests") {
    // reference values of the 64-bit FNV-1a test vectors
    CHECK(io::fnv1a(std::string("")) == 0xcbf29ce484222325ull);
    CHECK(io::fnv1a(std::string("a")) == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a(std::string("foobar")) == 0x85944171f73967e8ull);
    CHECK(io::hash_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");

    std::string path = tmp_dir() + "/hashed.bin";
    io::write_text(path, "foobar");
    CHECK(io::file_fnv1a(path) == 0x85944171f73967e8ull);
    CHECK_THROWS_AS(io::file_fnv1a(tmp_dir() + "/nope.bin"), DataError);
}

TEST_CASE("tensor archives round-trip bitwise") {
    Rng rng(4);
    Tensor a({3, 5});
    for (auto& v : a.vec()) v = rng.normal();
    Tensor b({2, 2, 2, 2});
    for (auto& v : b.vec()) v = rng.uniform(-10.0, 10.0);
    b[3] = -0.0;
    b[5] = std::numeric_limits<double>::denorm_min();
    Tensor c({1});
    c[0] = 1.0 + std::numeric_limits<double>::epsilon();

    std::string path = tmp_dir() + "/arch.bin";
    io::save_archive(path, {{"alpha", &a}, {"beta", &b}, {"gamma", &c}});
    auto loaded = io::load_archive(path);
    REQUIRE(loaded.size() == 3);
    REQUIRE(loaded.count("alpha") == 1);
    CHECK(loaded.at("alpha").shape() == a.shape());
    CHECK(std::memcmp(loaded.at("alpha").data(), a.data(), sizeof(double) * a.numel()) == 0);
    CHECK(std::memcmp(loaded.at("beta").data(), b.data(), sizeof(double) * b.numel()) == 0);
    CHECK(std::memcmp(loaded.at("gamma").data(), c.data(), sizeof(double) * c.numel()) == 0);

    // saving the same tensors twice produces identical bytes
    std::string path2 = tmp_dir() + "/arch2.bin";
    io::save_archive(path2, {{"alpha", &a}, {"beta", &b}, {"gamma", &c}});
    CHECK(io::read_text(path) == io::read_text(path2));
}

TEST_CASE("archive corruption is rejected") {
    Rng rng(9);
    Tensor a({4, 4});
    for (auto& v : a.vec()) v = rng.normal();
    std::string path = tmp_dir() + "/corrupt.bin";
    io::save_archive(path, {{"w", &a}});
    std::string bytes = io::read_text(path);

    SUBCASE("truncated payload") {
        io::write_text(path, bytes.substr(0, bytes.size() - 7));
        CHECK_THROWS_AS(io::load_archive(path), DataError);
    }
    SUBCASE("truncated header") {
        io::write_text(path, bytes.substr(0, 6));
        CHECK_THROWS_AS(io::load_archive(path), DataError);
    }
    SUBCASE("bad magic") {
        std::string mangled = bytes;
        mangled[0] = 'X';
        io::write_text(path, mangled);
        CHECK_THROWS_AS(io::load_archive(path), DataError);
    }
    SUBCASE("absurd name length") {
        std::string mangled = bytes;
        // name_len sits right after magic+version+count
        mangled[12] = '\xff';
        mangled[13] = '\xff';
        mangled[14] = '\xff';
        io::write_text(path, mangled);
        CHECK_THROWS_AS(io::load_archive(path), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::load_archive(tmp_dir() + "/absent.bin"), DataError);
    }
}

TEST_CASE("csv round-trips doubles exactly") {
    std::vector<std::string> cols = {"iter", "loss", "weird"};
    std::vector<std::vector<double>> rows = {
        {1.0, 0.1, -0.0},
        {2.0, 1.0 / 3.0, 1e-300},
        {3.0, std::nextafter(2.0, 3.0), -1.7976931348623157e308},
    };
    std::string path = tmp_dir() + "/log.csv";
    io::write_csv(path, cols, rows);
    io::Csv back = io::read_csv(path);
    CHECK(back.columns == cols);
    REQUIRE(back.rows.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) {
            double want = rows[i][j], got = back.rows[i][j];
            CHECK(std::memcmp(&want, &got, sizeof(double)) == 0);
        }

    CHECK(back.column_index("loss") == 1);
    CHECK(back.column_index("absent") == -1);

    // identical rows give identical bytes
    std::string path2 = tmp_dir() + "/log2.csv";
    io::write_csv(path2, cols, rows);
    CHECK(io::read_text(path) == io::read_text(path2));
}

TEST_CASE("csv parsing handles gaps and rejects ragged rows") {
    std::string path = tmp_dir() + "/gaps.csv";
    io::write_text(path, "a,b,c\n1,,3\n4,5,\n");
    io::Csv csv = io::read_csv(path);
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[0][0] == 1.0);
    CHECK(std::isnan(csv.rows[0][1]));
    CHECK(csv.rows[0][2] == 3.0);
    CHECK(std::isnan(csv.rows[1][2]));

    io::write_text(path, "a,b\n1,2,3\n");
    CHECK_THROWS_AS(io::read_csv(path), DataError);
    CHECK_THROWS_AS(io::read_csv(tmp_dir() + "/absent.csv"), DataError);

    CHECK_THROWS_AS(io::write_csv(tmp_dir() + "/bad.csv", {"a"}, {{1.0, 2.0}}),
                    ValidationError);
}
