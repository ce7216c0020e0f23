#include "molopt/datapath.hpp"

#include <cstdlib>

namespace molopt {

const std::string& data_dir() {
  static const std::string dir = [] {
    if (const char* env = std::getenv("MOLOPT_DATA_DIR"); env && *env)
      return std::string(env);
#ifdef MOLOPT_DATA_DIR
    return std::string(MOLOPT_DATA_DIR);
#else
    return std::string("data");
#endif
  }();
  return dir;
}

std::string data_file(const std::string& name) { return data_dir() + "/" + name; }

}  // namespace molopt
