// Predict-command stand-in for tests. Usage:
//   stub_adapter [--count FILE] MODE [ARGS...]
// Modes:
//   constant VALUE          every row predicts VALUE (class or number)
//   threshold FEATURE T     class[1] when FEATURE > T, else class[0]; regression: 1 or 0
//   copy FEATURE            prediction = FEATURE cell (regression)
//   row                     regression: prediction = running row index across the batch
//   fail                    message on stderr, exit 1
//   sleep SECONDS           sleep, then behave like `constant 0`
//   short                   one row fewer than the input
//   garbage                 output without a prediction column
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tabcheck/csv.hpp"
#include "tabcheck/dataset.hpp"

namespace {

std::vector<std::string> env_classes() {
    std::vector<std::string> out;
    const char* raw = std::getenv("DEEPCHECKS_CLASSES");
    if (raw == nullptr || *raw == '\0') return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

bool classification() {
    const char* t = std::getenv("DEEPCHECKS_TASK");
    return t != nullptr && std::string(t) == "classification";
}

std::size_t column_index(const tabcheck::CsvTable& table, const std::string& name) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == name) return j;
    }
    std::cerr << "stub_adapter: no column '" << name << "'\n";
    std::exit(1);
}

void emit(std::ostream& out, const std::vector<std::string>& predictions, const std::vector<std::string>& classes) {
    const bool cls = classification();
    out << "prediction";
    if (cls) {
        for (const auto& c : classes) out << ",proba_" << c;
    }
    out << "\n";
    for (const auto& p : predictions) {
        out << p;
        if (cls) {
            for (const auto& c : classes) out << (c == p ? ",1" : ",0");
        }
        out << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.size() >= 2 && args[0] == "--count") {
        std::ofstream(args[1], std::ios::app) << "call\n";
        args.erase(args.begin(), args.begin() + 2);
    }
    if (args.empty()) {
        std::cerr << "stub_adapter: missing mode\n";
        return 1;
    }
    const std::string input((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    const std::string& mode = args[0];
    if (mode == "fail") {
        std::cerr << "stub failure: model file not found\n";
        return 1;
    }
    const auto table = tabcheck::parse_csv(input);
    const auto classes = env_classes();
    const std::size_t n = table.rows.size();
    std::vector<std::string> preds;

    if (mode == "constant" || mode == "sleep") {
        if (mode == "sleep") std::this_thread::sleep_for(std::chrono::duration<double>(std::stod(args.at(1))));
        const std::string value = mode == "constant" ? args.at(1) : (classification() ? classes.at(0) : "0");
        preds.assign(n, value);
    } else if (mode == "threshold") {
        const auto j = column_index(table, args.at(1));
        const double t = std::stod(args.at(2));
        for (const auto& row : table.rows) {
            const auto v = tabcheck::parse_number(row[j]);
            const bool high = v && *v > t;
            preds.push_back(classification() ? classes.at(high ? 1 : 0) : (high ? "1" : "0"));
        }
    } else if (mode == "copy") {
        const auto j = column_index(table, args.at(1));
        for (const auto& row : table.rows) preds.push_back(row[j].empty() ? "0" : row[j]);
    } else if (mode == "row") {
        for (std::size_t i = 0; i < n; ++i) preds.push_back(std::to_string(i));
    } else if (mode == "short") {
        preds.assign(n == 0 ? 0 : n - 1, classification() ? classes.at(0) : "0");
    } else if (mode == "garbage") {
        std::cout << "value\n1\n";
        return 0;
    } else {
        std::cerr << "stub_adapter: unknown mode '" << mode << "'\n";
        return 1;
    }
    emit(std::cout, preds, classes);
    return 0;
}
