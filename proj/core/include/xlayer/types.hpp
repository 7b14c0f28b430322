#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace xlayer {

using NodeId = std::size_t;

/// Transmit power per node, in watts. Index is the node id.
using PowerVector = std::vector<double>;

/// Directed radio link from transmitter `from` to receiver `to`.
struct Link {
    NodeId from = 0;
    NodeId to = 0;

    friend auto operator<=>(const Link&, const Link&) = default;
};

enum class ReceiverKind { matched, lmmse };

std::string to_string(ReceiverKind kind);
ReceiverKind receiver_from_string(const std::string& text);

/// Raised when a scenario or CLI configuration is malformed. `key()` names the
/// offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

inline double total_power(const PowerVector& p) {
    double sum = 0.0;
    for (double v : p) sum += v;
    return sum;
}

}  // namespace xlayer
