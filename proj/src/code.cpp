#include "udcp/code.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "udcp/errors.hpp"

namespace udcp {

BinaryCode::BinaryCode(int n, std::vector<Word> words) : n_(n), words_(std::move(words)) {
    if (n_ < 0) throw ValidationError("code word length must be >= 0");
    if (words_.empty()) throw ValidationError("empty codes are rejected");
    for (const Word& w : words_) {
        if (w.length() != n_) throw ValidationError("all code words must share the word length");
    }
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

BinaryCode BinaryCode::full_cube(int n) {
    if (n < 0 || n > 24) throw ValidationError("full cube supported for n <= 24");
    std::vector<Word> ws;
    ws.reserve(1ull << n);
    for (std::uint64_t v = 0; v < (1ull << n); ++v) ws.push_back(Word::from_bits(n, v));
    return BinaryCode(n, std::move(ws));
}

BinaryCode BinaryCode::parse_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::vector<Word> ws;
    int n = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        Word w = Word::parse(line);
        if (n < 0)
            n = w.length();
        else if (w.length() != n)
            throw ValidationError(source + ":" + std::to_string(lineno) + ": word length " +
                                  std::to_string(w.length()) + " differs from " + std::to_string(n));
        ws.push_back(std::move(w));
    }
    if (ws.empty()) throw ValidationError(source + ": no code words found");
    return BinaryCode(n, std::move(ws));
}

BinaryCode BinaryCode::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open code file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

bool BinaryCode::contains(const Word& w) const {
    return std::binary_search(words_.begin(), words_.end(), w);
}

std::string BinaryCode::to_text() const {
    std::string out;
    for (const Word& w : words_) {
        out += w.str();
        out += '\n';
    }
    return out;
}

void BinaryCode::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write code file: " + path);
    out << to_text();
}

CodePair::CodePair(BinaryCode a, BinaryCode b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.length() != b_.length()) throw ValidationError("code pair word lengths differ");
    if (a_.length() == 0) throw ValidationError("code pair needs word length >= 1");
}

}  // namespace udcp
