#pragma once

#include <string>
#include <vector>

#include "adtlayout/pipeline.hpp"

namespace adtlayout::oracle {

inline std::vector<std::string> corpus_files() {
  return {std::string(ADTLAYOUT_CORPUS_DIR) + "/adts.adt", std::string(ADTLAYOUT_CORPUS_DIR) + "/float.adt"};
}

inline std::vector<std::string> corpus_instances() { return {"Option<u32>", "Option<Node>", "Option<double>"}; }

inline Compilation compile_corpus(const Target& target = Target::x64()) {
  CompileOptions o;
  o.target = target;
  o.instantiate = corpus_instances();
  return compile_files(corpus_files(), o);
}

}  // namespace adtlayout::oracle
