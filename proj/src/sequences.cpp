#include "qwalk/sequences.hpp"

#include <stdexcept>
#include <utility>

namespace qwalk {

namespace {

void require_length(std::size_t length)
{
    if (length == 0)
        throw std::invalid_argument("sequence length must be positive");
}

Letter flip(Letter l) { return l == Letter::A ? Letter::B : Letter::A; }

} // namespace

std::string_view to_string(SequenceKind kind)
{
    switch (kind) {
    case SequenceKind::two_periodic: return "two-periodic";
    case SequenceKind::fibonacci: return "fibonacci";
    case SequenceKind::thue_morse: return "thue-morse";
    case SequenceKind::rudin_shapiro: return "rudin-shapiro";
    case SequenceKind::random: return "random";
    }
    return "unknown";
}

SequenceKind parse_sequence_kind(std::string_view name)
{
    for (auto k : {SequenceKind::two_periodic, SequenceKind::fibonacci, SequenceKind::thue_morse,
                   SequenceKind::rudin_shapiro, SequenceKind::random})
        if (name == to_string(k))
            return k;
    throw std::invalid_argument("unknown sequence kind '" + std::string(name) + "'");
}

std::string LetterString::str() const
{
    std::string out;
    out.reserve(letters.size());
    for (auto l : letters)
        out.push_back(static_cast<char>(l));
    return out;
}

LetterString generate_two_periodic(std::size_t length)
{
    require_length(length);
    LetterString s{SequenceKind::two_periodic, {}};
    s.letters.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        s.letters.push_back(i % 2 == 0 ? Letter::A : Letter::B);
    return s;
}

LetterString generate_fibonacci(std::size_t length)
{
    require_length(length);
    // S_{k+1} = S_k S_{k-1}, S_1 = B, S_2 = A. Every S_k (k >= 2) is a prefix of S_{k+1}.
    std::vector<Letter> prev{Letter::B};
    std::vector<Letter> cur{Letter::A};
    while (cur.size() < length) {
        std::vector<Letter> next = cur;
        next.insert(next.end(), prev.begin(), prev.end());
        prev = std::move(cur);
        cur = std::move(next);
    }
    cur.resize(length);
    return {SequenceKind::fibonacci, std::move(cur)};
}

LetterString generate_thue_morse(std::size_t length)
{
    require_length(length);
    std::vector<Letter> word{Letter::A};
    word.reserve(2 * length);
    while (word.size() < length) {
        const auto n = word.size();
        for (std::size_t i = 0; i < n; ++i)
            word.push_back(flip(word[i]));
    }
    word.resize(length);
    return {SequenceKind::thue_morse, std::move(word)};
}

LetterString generate_rudin_shapiro(std::size_t length)
{
    require_length(length);
    enum Sym : unsigned char { P, Q, R, S };
    // P -> PQ, Q -> PR, R -> SQ, S -> SR
    static constexpr Sym rule[4][2] = {{P, Q}, {P, R}, {S, Q}, {S, R}};

    std::vector<Sym> word{P};
    while (word.size() < length) {
        std::vector<Sym> next;
        next.reserve(2 * word.size());
        for (auto c : word) {
            next.push_back(rule[c][0]);
            next.push_back(rule[c][1]);
        }
        word = std::move(next);
    }

    LetterString s{SequenceKind::rudin_shapiro, {}};
    s.letters.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
        s.letters.push_back(word[i] == P || word[i] == Q ? Letter::A : Letter::B);
    return s;
}

std::uint64_t splitmix64(std::uint64_t &state)
{
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

LetterString generate_random(std::size_t length, std::uint64_t seed)
{
    require_length(length);
    LetterString s{SequenceKind::random, {}};
    s.letters.reserve(length);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < length; ++i)
        s.letters.push_back((splitmix64(state) >> 63) == 0 ? Letter::A : Letter::B);
    return s;
}

LetterString generate(SequenceKind kind, std::size_t length, std::uint64_t seed)
{
    switch (kind) {
    case SequenceKind::two_periodic: return generate_two_periodic(length);
    case SequenceKind::fibonacci: return generate_fibonacci(length);
    case SequenceKind::thue_morse: return generate_thue_morse(length);
    case SequenceKind::rudin_shapiro: return generate_rudin_shapiro(length);
    case SequenceKind::random: return generate_random(length, seed);
    }
    throw std::invalid_argument("unknown sequence kind");
}

WeightFunction weight_function(const LetterString &s)
{
    WeightFunction w;
    w.signs.reserve(s.size());
    for (auto l : s.letters)
        w.signs.push_back(l == Letter::A ? 1 : -1);
    return w;
}

LetterString parse_letters(std::string_view text, SequenceKind kind)
{
    LetterString s{kind, {}};
    s.letters.reserve(text.size());
    for (char c : text) {
        if (c == 'A')
            s.letters.push_back(Letter::A);
        else if (c == 'B')
            s.letters.push_back(Letter::B);
        else
            throw std::invalid_argument(std::string("invalid letter '") + c + "'");
    }
    return s;
}

} // namespace qwalk
