#include "mednlu/text.hpp"

#include "mednlu/error.hpp"

namespace mednlu::text {

namespace {

// Length in bytes of the UTF-8 sequence starting at pos; 1 for invalid leads
// or truncated sequences so iteration always makes progress.
std::size_t seq_len(std::string_view s, std::size_t pos) {
    unsigned char c = static_cast<unsigned char>(s[pos]);
    std::size_t n;
    if (c < 0x80) n = 1;
    else if ((c & 0xe0) == 0xc0) n = 2;
    else if ((c & 0xf0) == 0xe0) n = 3;
    else if ((c & 0xf8) == 0xf0) n = 4;
    else return 1;
    if (pos + n > s.size()) return 1;
    for (std::size_t i = 1; i < n; ++i) {
        if ((static_cast<unsigned char>(s[pos + i]) & 0xc0) != 0x80) return 1;
    }
    return n;
}

} // namespace

std::size_t cp_length(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); i += seq_len(s, i)) ++n;
    return n;
}

std::size_t cp_to_byte(std::string_view s, std::size_t cp) {
    std::size_t i = 0, n = 0;
    while (i < s.size() && n < cp) {
        i += seq_len(s, i);
        ++n;
    }
    if (n < cp) fail(Errc::IndexOutOfRange,
                     "code point " + std::to_string(cp) + " past end (" + std::to_string(n) + ")");
    return i;
}

std::string cp_slice(std::string_view s, std::size_t start, std::size_t end) {
    if (start > end) fail(Errc::IndexOutOfRange, "slice start > end");
    std::size_t b0 = cp_to_byte(s, start);
    std::size_t b1 = cp_to_byte(s, end);
    return std::string(s.substr(b0, b1 - b0));
}

std::optional<std::size_t> cp_find(std::string_view hay, std::string_view needle,
                                   std::size_t from) {
    if (needle.empty()) return from <= cp_length(hay) ? std::optional<std::size_t>(from) : std::nullopt;
    std::size_t i = 0, n = 0;
    while (i < hay.size() && n < from) {
        i += seq_len(hay, i);
        ++n;
    }
    while (i < hay.size()) {
        if (hay.compare(i, needle.size(), needle) == 0) return n;
        i += seq_len(hay, i);
        ++n;
    }
    return std::nullopt;
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view ltrim(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && is_ascii_space(s[i])) ++i;
    return s.substr(i);
}

std::string_view rtrim(std::string_view s) {
    std::size_t i = s.size();
    while (i > 0 && is_ascii_space(s[i - 1])) --i;
    return s.substr(0, i);
}

std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::size_t word_count(std::string_view s) {
    std::size_t n = 0;
    bool in_tok = false;
    for (char c : s) {
        if (is_ascii_space(c)) {
            in_tok = false;
        } else if (!in_tok) {
            in_tok = true;
            ++n;
        }
    }
    return n;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            std::string_view line = s.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            out.emplace_back(line);
            start = i + 1;
        }
    }
    if (!s.empty() && s.back() == '\n') out.pop_back();
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace mednlu::text
