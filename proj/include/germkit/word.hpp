#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"

namespace germkit {

enum class Letter : unsigned char { F = 0, G = 1 };

// Word in the two generators. The leftmost letter is the outermost map, so
// "FG" evaluates to f o g (g applied first).
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    static Word parse(const std::string& text)
    {
        std::vector<Letter> v;
        for (char c : text) {
            if (c == 'F' || c == 'f')
                v.push_back(Letter::F);
            else if (c == 'G' || c == 'g')
                v.push_back(Letter::G);
            else
                fail(ErrorKind::ParseError, std::string("word letters are F and G, got '") + c + "'");
        }
        return Word(std::move(v));
    }

    // The i-th word of length `len` in lexicographic order (F < G).
    static Word from_index(std::size_t index, int len)
    {
        std::vector<Letter> v(static_cast<std::size_t>(len));
        for (int i = len - 1; i >= 0; --i, index >>= 1)
            v[static_cast<std::size_t>(i)] = (index & 1) ? Letter::G : Letter::F;
        return Word(std::move(v));
    }

    static Word repeat(Letter l, int times) { return Word(std::vector<Letter>(static_cast<std::size_t>(times), l)); }

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }

    Word operator+(const Word& other) const
    {
        auto v = letters_;
        v.insert(v.end(), other.letters_.begin(), other.letters_.end());
        return Word(std::move(v));
    }

    std::string str() const
    {
        std::string s;
        for (auto l : letters_)
            s.push_back(l == Letter::F ? 'F' : 'G');
        return s;
    }

    bool operator==(const Word&) const = default;

    // Shortlex: shorter words first, then lexicographic with F < G.
    std::strong_ordering operator<=>(const Word& o) const
    {
        if (auto c = letters_.size() <=> o.letters_.size(); c != 0)
            return c;
        return letters_ <=> o.letters_;
    }

private:
    std::vector<Letter> letters_;
};

} // namespace germkit
