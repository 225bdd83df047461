#pragma once

#include <iosfwd>
#include <string>

#include "prte/estimator.hpp"
#include "prte/montecarlo.hpp"
#include "prte/types.hpp"

namespace prte::io {

// Reads a CSV with header columns y, s, x1..xK, z1..zM (any order) into a
// Dataset with identity feature maps. Malformed rows, a non-binary s and
// missing columns raise IngestError naming the offending line.
Dataset ingest_csv(const std::string& path);
Dataset ingest_csv(std::istream& in, const std::string& name = "<stream>");

// Full-precision CSV emission of a dataset in the ingestible layout.
void emit_dataset_csv(const Dataset& data, const std::string& path);

void emit_json(const EstimateResult& r, std::ostream& out);
void emit_json(const MCReport& r, std::ostream& out);
void emit_csv(const EstimateResult& r, std::ostream& out);
// One summary row: n,L,true,mean,bias,rmse,coverage.
void emit_csv(const MCReport& r, std::ostream& out);

// format is "json" or "csv"; path "-" writes to stdout.
void emit_report(const EstimateResult& r, const std::string& format,
                 const std::string& path);
void emit_report(const MCReport& r, const std::string& format,
                 const std::string& path);

}  // namespace prte::io
