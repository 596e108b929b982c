#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qwalk {

/// Coin label. A selects the first coin angle, B the second.
enum class Letter : char { A = 'A', B = 'B' };

enum class SequenceKind { two_periodic, fibonacci, thue_morse, rudin_shapiro, random };

std::string_view to_string(SequenceKind kind);
/// Accepts "two-periodic", "fibonacci", "thue-morse", "rudin-shapiro", "random".
SequenceKind parse_sequence_kind(std::string_view name);

/// A finite word over {A, B} together with the rule that produced it.
struct LetterString {
    SequenceKind kind = SequenceKind::two_periodic;
    std::vector<Letter> letters;

    std::size_t size() const { return letters.size(); }
    Letter operator[](std::size_t i) const { return letters[i]; }

    /// Plain-text form: one 'A'/'B' character per letter, no separators.
    std::string str() const;
};

/// +1 for A, -1 for B, one entry per lattice site x = -N..N (word index i = x + N).
struct WeightFunction {
    std::vector<int> signs;
    std::size_t size() const { return signs.size(); }
};

LetterString generate_two_periodic(std::size_t length);
LetterString generate_fibonacci(std::size_t length);
LetterString generate_thue_morse(std::size_t length);
LetterString generate_rudin_shapiro(std::size_t length);

/// I.i.d. uniform letters. Letter i is A when the top bit of the (i+1)-th
/// splitmix64 output seeded with `seed` is 0, B otherwise.
LetterString generate_random(std::size_t length, std::uint64_t seed);

/// Dispatches on `kind`; `seed` is only used for random strings.
LetterString generate(SequenceKind kind, std::size_t length, std::uint64_t seed = 0);

WeightFunction weight_function(const LetterString &s);

/// Parses a plain-text 'A'/'B' word. Throws std::invalid_argument on any other character.
LetterString parse_letters(std::string_view text, SequenceKind kind);

/// splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t &state);

} // namespace qwalk
