#pragma once

#include <optional>
#include <string>

#include "hermitsep/extraction.hpp"
#include "hermitsep/hermitian_tensor.hpp"
#include "hermitsep/psd_decomp.hpp"

namespace hermitsep {

inline constexpr const char* kToolVersion = "0.1.0";

struct TensorFileMetadata {
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> provenance;
};

/// Text (JSON) interchange: shape plus the flattening entries as [re, im]
/// pairs in row-major order.  Serialization is deterministic; reading back a
/// written file and writing again is byte-identical.
std::string tensorFileText(const HermitianTensor& h, const TensorFileMetadata& meta = {});
void writeTensorFile(const std::string& path, const HermitianTensor& h,
                     const TensorFileMetadata& meta = {});

struct TensorParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HermitianTensor parseTensorText(const std::string& text, TensorFileMetadata* meta = nullptr);
HermitianTensor readTensorFile(const std::string& path, TensorFileMetadata* meta = nullptr);

/// Random instances.  `separable` draws unit mode vectors (gauge-fixed
/// leading entries) with positive weights; `psdKind` draws full-rank psd
/// factor matrices; `hermitian` is an unstructured Hermitian tensor.
HermitianTensor randomSeparable(const Shape& shape, int terms, std::uint64_t seed,
                                HermitianDecomposition* generating = nullptr);
HermitianTensor randomPsdKind(const Shape& shape, int terms, std::uint64_t seed,
                              PsdDecomposition* generating = nullptr);
HermitianTensor randomHermitian(const Shape& shape, std::uint64_t seed);

/// Machine-readable result report.  Verdict strings map to process exit
/// codes: SEPARABLE/CERTIFIED_PSD -> 0, NOT_SEPARABLE -> 10,
/// INCONCLUSIVE/NOT_CERTIFIED -> 20.
struct ResultReport {
  std::string verdict;
  std::string json;  // serialized report body
  int exitCode = 0;
};

ResultReport reportFromVerdict(const HermitianTensor& h, const Verdict& verdict,
                               const AlgorithmOptions& opts, std::uint64_t seed,
                               double elapsedSeconds);
ResultReport reportFromPsdResult(const HermitianTensor& h, const PsdResult& result,
                                 std::uint64_t seed, double elapsedSeconds);

/// Re-checks a SEPARABLE / CERTIFIED_PSD / NOT_CERTIFIED-with-decomposition
/// report against the tensor: weights positive, vectors unit and gauge-fixed,
/// psd factors psd, residual within the report's recorded tolerance.  For
/// NOT_SEPARABLE the stored Farkas certificate is re-verified against the
/// reassembled relaxation.  Returns an empty string on success, else the
/// failure description.
std::string verifyReport(const HermitianTensor& h, const std::string& reportJson);

}  // namespace hermitsep
