#include "vqht/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "vqht/errors.hpp"

namespace vqht {

namespace {

void write_part(std::ostringstream& os, const Mat& m, bool imag)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << (imag ? m(r, c).imag() : m(r, c).real());
        }
        os << '\n';
    }
}

void expect(std::istringstream& is, const std::string& word)
{
    std::string got;
    if (!(is >> got) || got != word) {
        throw ValidationError("matrix file: expected '" + word + "', found '" + got + "'");
    }
}

}  // namespace

std::string format_matrix(const StoredMatrix& m)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "vqht-matrix 1\n";
    os << "kind " << m.kind << '\n';
    os << "dims";
    for (int d : m.dims) os << ' ' << d;
    os << '\n';
    os << "shape " << m.data.rows() << ' ' << m.data.cols() << '\n';
    os << "real\n";
    write_part(os, m.data, false);
    os << "imag\n";
    write_part(os, m.data, true);
    return os.str();
}

StoredMatrix parse_matrix(const std::string& text)
{
    std::istringstream is(text);
    StoredMatrix m;
    expect(is, "vqht-matrix");
    int version = 0;
    if (!(is >> version) || version != 1) throw ValidationError("matrix file: unsupported version");
    expect(is, "kind");
    is >> m.kind;
    if (m.kind != "ket" && m.kind != "density" && m.kind != "operator") {
        throw ValidationError("matrix file: unknown kind '" + m.kind + "'");
    }
    expect(is, "dims");
    std::string line;
    std::getline(is, line);
    std::istringstream ds(line);
    for (int d; ds >> d;) m.dims.push_back(d);
    expect(is, "shape");
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw ValidationError("matrix file: bad shape");
    Eigen::Index prod = 1;
    for (int d : m.dims) prod *= d;
    if (!m.dims.empty() && prod != rows) throw ValidationError("matrix file: dims do not match row count");
    RMat re(rows, cols), im(rows, cols);
    for (auto* part : {&re, &im}) {
        expect(is, part == &re ? "real" : "imag");
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!(is >> (*part)(r, c))) throw ValidationError("matrix file: truncated data");
            }
        }
    }
    m.data = re.cast<cplx>() + kI * im.cast<cplx>();
    return m;
}

void write_matrix(const std::string& path, const StoredMatrix& m)
{
    std::ofstream f(path);
    if (!f) throw UsageError("cannot open '" + path + "' for writing");
    f << format_matrix(m);
    if (!f) throw UsageError("write to '" + path + "' failed");
}

StoredMatrix read_matrix(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_matrix(ss.str());
}

}  // namespace vqht
