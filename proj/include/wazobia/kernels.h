#ifndef WAZOBIA_KERNELS_H_
#define WAZOBIA_KERNELS_H_

// Corpus-level loops over independent sentences. `serial` is the reference;
// `parallel` splits sentences across OpenMP threads, writes one result per
// sentence and reduces in index order, so both produce bit-identical output.

#include <span>
#include <vector>

#include "wazobia/bilstm.h"
#include "wazobia/crf.h"

namespace wazobia::kernels {

enum class Exec { kSerial, kParallel };

namespace serial {

std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data);
std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              bool hard_bio_constraints = false);
std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data);
std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data);

}  // namespace serial

namespace parallel {

std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data);
std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              bool hard_bio_constraints = false);
std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data);
std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data);

}  // namespace parallel

// Sum in index order divided by count; 0 for an empty span.
double mean(std::span<const double> values);

// Dispatchers used by the trainers.
std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data, Exec exec);
std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              Exec exec, bool hard_bio_constraints = false);
std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data, Exec exec);
std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data,
                                                  Exec exec);

int max_threads();

}  // namespace wazobia::kernels

#endif  // WAZOBIA_KERNELS_H_
