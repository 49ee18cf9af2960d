#pragma once

namespace dce::cli {

int run(int argc, char** argv);

}  // namespace dce::cli
