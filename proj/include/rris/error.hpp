#pragma once

#include <stdexcept>
#include <string>

namespace rris {

// Every error thrown by the library derives from Error so callers (the CLI in
// particular) can map it to a stable machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

struct DegenerateGeometry : Error {
    explicit DegenerateGeometry(const std::string& what) : Error("degenerate_geometry", what) {}
};

struct Infeasible : Error {
    explicit Infeasible(const std::string& what) : Error("infeasible", what) {}
};

struct InvalidState : Error {
    explicit InvalidState(const std::string& what) : Error("invalid_state", what) {}
};

struct ConfigError : Error {
    ConfigError(const std::string& key_path, const std::string& what)
        : Error("config", key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io", what) {}
};

} // namespace rris
