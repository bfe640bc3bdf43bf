#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ammlens {

// Malformed input file; message carries path, line and offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& detail)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + detail),
          path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

class MissingPriceError : public std::runtime_error {
public:
    MissingPriceError(const std::string& token, const std::string& day)
        : std::runtime_error("no USD price for token " + token + " on " + day),
          token_(token), day_(day) {}

    const std::string& token() const { return token_; }
    const std::string& day() const { return day_; }

private:
    std::string token_;
    std::string day_;
};

class MissingBlockDayError : public std::runtime_error {
public:
    explicit MissingBlockDayError(std::int64_t block)
        : std::runtime_error("no day mapping for block " + std::to_string(block)),
          block_(block) {}

    std::int64_t block() const { return block_; }

private:
    std::int64_t block_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ammlens
