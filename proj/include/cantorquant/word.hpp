#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace cantorquant {

/// Finite word over {1,2,3} naming the cylinder J_w = S_w([0,1]).
///
/// Stored as its digit string, so the defaulted ordering is lexicographic;
/// on words of equal length that is the left-to-right order of cylinders.
class Word {
public:
    Word() = default;

    explicit Word(std::string_view letters) : letters_(letters) {
        for (char c : letters_) {
            if (c < '1' || c > '3') {
                throw InputError("invalid letter '" + std::string(1, c) + "' in word '" +
                                 letters_ + "'");
            }
        }
    }

    /// Accepts the JSON spelling of the empty word as well.
    static Word parse(std::string_view text) {
        if (text == empty_symbol) return Word();
        return Word(text);
    }

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }

    /// Letter at position i as 1, 2 or 3.
    int letter(std::size_t i) const { return letters_.at(i) - '0'; }

    const std::string& str() const noexcept { return letters_; }

    /// "∅" for the empty word, the digits otherwise.
    std::string json_string() const { return empty() ? std::string(empty_symbol) : letters_; }

    Word child(int j) const {
        if (j < 1 || j > 3) throw InputError("child index must be 1, 2 or 3");
        Word w = *this;
        w.letters_.push_back(static_cast<char>('0' + j));
        return w;
    }

    Word operator+(const Word& tail) const {
        Word w = *this;
        w.letters_ += tail.letters_;
        return w;
    }

    bool is_prefix_of(const Word& other) const noexcept {
        return other.letters_.compare(0, letters_.size(), letters_) == 0 &&
               letters_.size() <= other.letters_.size();
    }

    auto operator<=>(const Word&) const = default;

    static constexpr std::string_view empty_symbol = "∅";

private:
    std::string letters_;
};

/// Union of cylinders; a quantizer region.
using Cell = std::vector<Word>;

inline Cell make_cell(std::initializer_list<std::string_view> words) {
    Cell cell;
    cell.reserve(words.size());
    for (auto w : words) cell.emplace_back(w);
    return cell;
}

/// Throws unless the cell is non-empty and no word is a prefix of another.
inline void validate_cell(const Cell& cell) {
    if (cell.empty()) throw InputError("cell must contain at least one word");
    for (std::size_t i = 0; i < cell.size(); ++i) {
        for (std::size_t j = 0; j < cell.size(); ++j) {
            if (i != j && cell[i].is_prefix_of(cell[j])) {
                throw InputError("cell words '" + cell[i].str() + "' and '" + cell[j].str() +
                                 "' overlap");
            }
        }
    }
}

/// All words of the given length in lexicographic order.
inline std::vector<Word> words_of_length(std::size_t length) {
    std::vector<Word> out{Word()};
    for (std::size_t k = 0; k < length; ++k) {
        std::vector<Word> next;
        next.reserve(out.size() * 3);
        for (const auto& w : out) {
            for (int j = 1; j <= 3; ++j) next.push_back(w.child(j));
        }
        out = std::move(next);
    }
    return out;
}

/// One-level refinement: every word replaced by its three children.
inline Cell refine(const Cell& cell) {
    Cell out;
    out.reserve(cell.size() * 3);
    for (const auto& w : cell) {
        for (int j = 1; j <= 3; ++j) out.push_back(w.child(j));
    }
    return out;
}

inline Cell prefix_cell(const Word& prefix, const Cell& cell) {
    Cell out;
    out.reserve(cell.size());
    for (const auto& w : cell) out.push_back(prefix + w);
    return out;
}

inline std::string join_words(const Cell& cell, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (i) out += sep;
        out += cell[i].str();
    }
    return out;
}

} // namespace cantorquant
