#ifndef KNEAD_ERROR_HPP
#define KNEAD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace knead {

/// Library error with a stable machine-readable code alongside the message.
/// Codes in use: "syntax", "out_of_range", "alphabet_mismatch", "domain",
/// "degenerate", "not_kneading", "precision", "empty_case", "empty_cover",
/// "budget", "internal".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void raise(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

} // namespace knead

#endif
