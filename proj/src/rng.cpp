#include "cslr/rng.hpp"

#include "cslr/error.hpp"

namespace cslr {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::BracketInvalid: return "BracketInvalid";
        case ErrorCode::AllExcluded: return "AllExcluded";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DivergentIntegral: return "DivergentIntegral";
        case ErrorCode::AllFailed: return "AllFailed";
        case ErrorCode::UnsupportedModel: return "UnsupportedModel";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::uint64_t CounterRng::next_u64() noexcept {
    // Two rounds of the finalizer over (key, counter) behave like a keyed
    // hash; a single round leaves visible structure between adjacent keys.
    const std::uint64_t c = counter_++;
    return splitmix64(key_ ^ splitmix64(c * 0xd1b54a32d192ed03ULL + key_));
}

double CounterRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace cslr
