#pragma once

#include "femscript/dsl/parser.hpp"
#include "femscript/error.hpp"
#include "femscript/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace femscript::dsl
{

/// Runtime failure inside a script; the message carries the source line.
class ScriptError : public Error
{
public:
    ScriptError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
    {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RunOptions
{
    int verbosity = 2;
    bool allow_exec = false;
    bool plot_files = true; ///< honour plot(..., ps="file.eps")
    std::filesystem::path base_dir = ".";
    std::ostream* out = nullptr; ///< cout; defaults to std::cout
    std::istream* in = nullptr;  ///< cin; defaults to std::cin
    std::ostream* log = nullptr; ///< warnings and verbose output; defaults to std::cerr
};

/// Tree-walking evaluator. One instance per thread; instances share nothing.
class Interpreter
{
public:
    explicit Interpreter(RunOptions options = {});
    ~Interpreter();
    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    /// Executes every statement; returns the argument of exit(n), else 0.
    /// Script failures are ScriptErrors.
    int run(const Program& program);
    int run_source(std::string_view source);
    int run_file(const std::filesystem::path& path);

    // Inspection of the global scope after a run.
    bool has(const std::string& name) const;
    std::optional<double> number(const std::string& name) const;
    std::optional<std::string> string(const std::string& name) const;
    /// Real arrays, and the DOF vector of finite element functions.
    std::optional<std::vector<double>> array(const std::string& name) const;
    std::shared_ptr<const Mesh> mesh(const std::string& name) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace femscript::dsl
