#ifndef MOLOPT_DATAPATH_HPP
#define MOLOPT_DATAPATH_HPP

#include <string>

namespace molopt {

// Directory holding the packaged data tables. Resolution order:
// MOLOPT_DATA_DIR environment variable, then the build-time source path.
const std::string& data_dir();
std::string data_file(const std::string& name);

}  // namespace molopt

#endif
