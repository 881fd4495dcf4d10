#include "udcp/word.hpp"

#include <cstdlib>

namespace udcp {

Word parse_coord_set(const std::string& csv, int n) {
    Word mask(n);
    if (csv.empty()) return mask;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        const std::string tok = csv.substr(pos, next - pos);
        char* end = nullptr;
        long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0')
            throw ValidationError("bad coordinate '" + tok + "' in set");
        if (v < 1 || v > n)
            throw ValidationError("coordinate " + tok + " out of range 1.." + std::to_string(n));
        mask.set_bit(static_cast<int>(v - 1), true);
        pos = next + 1;
    }
    return mask;
}

std::vector<int> coords_1based(const Word& mask) {
    std::vector<int> out;
    for (int i = 0; i < mask.length(); ++i)
        if (mask.bit(i)) out.push_back(i + 1);
    return out;
}

}  // namespace udcp
