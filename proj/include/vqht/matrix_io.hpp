#pragma once

#include <string>
#include <vector>

#include "vqht/linalg.hpp"

namespace vqht {

/// Text container for complex matrices:
///
///   vqht-matrix 1
///   kind <ket|density|operator>
///   dims d_1 ... d_n
///   shape <rows> <cols>
///   real
///   <rows lines of cols values>
///   imag
///   <rows lines of cols values>
///
/// Values are written with 17 significant digits so they round-trip exactly.
struct StoredMatrix {
    std::string kind = "operator";
    std::vector<int> dims;
    Mat data;
};

void write_matrix(const std::string& path, const StoredMatrix& m);
StoredMatrix read_matrix(const std::string& path);

std::string format_matrix(const StoredMatrix& m);
StoredMatrix parse_matrix(const std::string& text);

}  // namespace vqht
