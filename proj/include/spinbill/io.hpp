#pragma once

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spinbill {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

/// Output file under a fixed directory. Names containing a path separator or
/// ".." are rejected so nothing lands outside that directory.
inline std::ofstream open_output(const std::filesystem::path& dir, std::string_view name)
{
    if (name.empty() || name.find('/') != std::string_view::npos || name.find('\\') != std::string_view::npos ||
        name == "." || name == "..")
        throw std::invalid_argument("open_output: invalid file name '" + std::string(name) + "'");
    std::ofstream os(dir / std::string(name), std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open '" + (dir / std::string(name)).string() + "' for writing");
    return os;
}

} // namespace spinbill
