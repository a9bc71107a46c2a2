#include <cstdio>
#include <exception>

#include "blockdp/errors.hpp"
#include "blockdp/version.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"block-structured privacy budget simulator"};
  app.set_version_flag("--version", blockdp::kVersion);
  app.require_subcommand(1);

  int rc = 0;
  blockdp::cli::register_run(app, rc);
  blockdp::cli::register_bounds(app, rc);
  blockdp::cli::register_gen(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const blockdp::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const blockdp::SpecError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
