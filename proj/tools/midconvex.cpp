#include "midconvex/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Midconvexity checks, decompositions and verification campaigns"};
  std::string input_file;
  std::string expr;
  std::string format = "text";
  unsigned jobs = 1;
  bool timing = false;
  app.add_option("input", input_file, "Program file (reads standard input when omitted)");
  app.add_option("-e,--expr", expr, "Program text given inline");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--jobs", jobs, "Worker threads for verification campaigns")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "Record elapsed time in reports");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : midconvex::cli::kUsage;
  }

  std::string text;
  if (!expr.empty()) {
    text = expr;
  } else if (!input_file.empty()) {
    std::ifstream in(input_file);
    if (!in) {
      std::cerr << "error: cannot open " << input_file << "\n";
      return midconvex::cli::kUsage;
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }

  midconvex::cli::RunOptions options;
  options.format = format == "json" ? midconvex::cli::Format::kJson : midconvex::cli::Format::kText;
  options.jobs = jobs;
  options.timing = timing;
  const auto result = midconvex::cli::run_text(text, options);
  (result.exit_code == midconvex::cli::kUsage ? std::cerr : std::cout) << result.output;
  return result.exit_code;
}
