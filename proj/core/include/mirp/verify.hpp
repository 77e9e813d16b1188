#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mirp {

struct SuiteResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  // first few offending cases in grammar form
  std::vector<std::string> failures;
  double seconds = 0;

  bool ok() const { return failed == 0; }
};

struct VerifyOptions {
  unsigned d = 2;
  // total-degree budgets per suite family
  unsigned prelie_degree = 3;
  unsigned product_degree = 5;
  unsigned bialgebra_degree = 4;
  unsigned coproduct_degree = 5;
  unsigned insertion_degree = 4;
  // perturbs one coefficient in the associativity suite (harness self-test)
  bool inject_fault = false;
};

SuiteResult verify_prelie_nap(const VerifyOptions& opt);
SuiteResult verify_gl_associativity(const VerifyOptions& opt);
SuiteResult verify_gl_unit(const VerifyOptions& opt);
SuiteResult verify_bialgebra(const VerifyOptions& opt);
SuiteResult verify_deshuffle_coassociativity(const VerifyOptions& opt);
SuiteResult verify_deshuffle_cocommutativity(const VerifyOptions& opt);
SuiteResult verify_population(const VerifyOptions& opt);
SuiteResult verify_grading(const VerifyOptions& opt);
SuiteResult verify_coproduct_routes(const VerifyOptions& opt);
SuiteResult verify_adjointness(const VerifyOptions& opt);
SuiteResult verify_insertion_prelie(const VerifyOptions& opt);
SuiteResult verify_translation_morphism(const VerifyOptions& opt);
SuiteResult verify_dual_translation(const VerifyOptions& opt);

std::vector<SuiteResult> verify_algebra(const VerifyOptions& opt);
std::vector<SuiteResult> verify_insertion(const VerifyOptions& opt);
std::vector<SuiteResult> verify_all(const VerifyOptions& opt);

}  // namespace mirp
