#pragma once

namespace mmfso {

// Provenance of a reported number.
enum class Tag { Analytic, NumericFallback, MonteCarlo };
const char* to_string(Tag tag);

// A value together with how it was obtained.
struct Evaluated {
    double value = 0.0;
    Tag tag = Tag::Analytic;
};

inline Tag worst(Tag a, Tag b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

}  // namespace mmfso
