#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "vqht/errors.hpp"
#include "vqht/matrix_io.hpp"
#include "vqht/qsim.hpp"

using namespace vqht;

TEST_CASE("matrix text format round-trips exactly")
{
    StoredMatrix m;
    m.kind = "density";
    m.dims = {2, 3};
    m.data = random_density_matrix({2, 3}, 2, 17).data();
    m.data(0, 1) += cplx(1e-300, -3.141592653589793e200);
    const auto back = parse_matrix(format_matrix(m));
    CHECK(back.kind == "density");
    CHECK(back.dims == m.dims);
    CHECK(back.data == m.data);

    StoredMatrix k;
    k.kind = "ket";
    k.dims = {4};
    k.data = haar_random_ket(4, 3);
    const auto path = (std::filesystem::temp_directory_path() / "vqht_io_test.txt").string();
    write_matrix(path, k);
    const auto kb = read_matrix(path);
    std::remove(path.c_str());
    CHECK(kb.data == k.data);
    CHECK(kb.data.cols() == 1);
}

TEST_CASE("malformed matrix files are rejected")
{
    CHECK_THROWS_AS(parse_matrix("nonsense"), ValidationError);
    CHECK_THROWS_AS(parse_matrix("vqht-matrix 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_matrix("vqht-matrix 1\nkind tensor\n"), ValidationError);
    CHECK_THROWS_AS(parse_matrix("vqht-matrix 1\nkind ket\ndims 3\nshape 2 1\nreal\n1\n0\nimag\n0\n0\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_matrix("vqht-matrix 1\nkind ket\ndims 2\nshape 2 1\nreal\n1\n"), ValidationError);
    CHECK_THROWS_AS(read_matrix("/nonexistent/dir/file.txt"), UsageError);
}
