#pragma once

#include "fggpp/ppl_types.hpp"
#include "fggpp/simplify.hpp"
#include "fggpp/translate.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace fgg {

// Any error in the source program or its parameter file.
class FrontendError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CompileOptions {
    PassSet passes = all_passes();
    ppl::DomainOptions domains;
};

struct Compiled {
    // Desugared, with names resolved against the parameters.
    ppl::Program program;
    ppl::TypedProgram typed;
    CompilationUnit raw;
    CompilationUnit unit;
};

// parse -> desugar -> resolve names -> scope check -> domains -> translate
// -> simplify. Throws FrontendError with source positions.
Compiled compile_source(const std::string& source, const ppl::Params& params, const CompileOptions& options = {});
Compiled compile_file(const std::string& source_path, const std::string& params_path,
                      const CompileOptions& options = {});

// {"rules": [{"index", "lhs", "origins": [{"line", "column", "construct"}]}],
//  "passes": [...]}
nlohmann::json provenance_to_json(const CompilationUnit& cu);

}  // namespace fgg
