#include "wazobia/kernels.h"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wazobia::kernels {
namespace {

// Runs body(i) for every i in [0, n) across threads. The first exception
// thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(wazobia_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

namespace serial {

std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = crf::nll(params, data[i].features, data[i].gold);
  }
  return out;
}

std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              bool hard_bio_constraints) {
  std::vector<std::vector<BioLabel>> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = crf::decode(params, data[i].features, hard_bio_constraints);
  }
  return out;
}

std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = bilstm::loss(params, data[i].words, data[i].gold);
  }
  return out;
}

std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data) {
  std::vector<std::vector<BioLabel>> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = bilstm::predict(params, data[i].words);
  }
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data) {
  std::vector<double> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    out[i] = crf::nll(params, data[i].features, data[i].gold);
  });
  return out;
}

std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              bool hard_bio_constraints) {
  std::vector<std::vector<BioLabel>> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    out[i] = crf::decode(params, data[i].features, hard_bio_constraints);
  });
  return out;
}

std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data) {
  std::vector<double> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    out[i] = bilstm::loss(params, data[i].words, data[i].gold);
  });
  return out;
}

std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data) {
  std::vector<std::vector<BioLabel>> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    out[i] = bilstm::predict(params, data[i].words);
  });
  return out;
}

}  // namespace parallel

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<double> crf_losses(const crf::CrfParams& params,
                               std::span<const crf::Instance> data, Exec exec) {
  return exec == Exec::kParallel ? parallel::crf_losses(params, data)
                                 : serial::crf_losses(params, data);
}

std::vector<std::vector<BioLabel>> crf_decode(const crf::CrfParams& params,
                                              std::span<const crf::Instance> data,
                                              Exec exec, bool hard_bio_constraints) {
  return exec == Exec::kParallel
             ? parallel::crf_decode(params, data, hard_bio_constraints)
             : serial::crf_decode(params, data, hard_bio_constraints);
}

std::vector<double> bilstm_losses(const bilstm::BilstmParams& params,
                                  std::span<const bilstm::Instance> data, Exec exec) {
  return exec == Exec::kParallel ? parallel::bilstm_losses(params, data)
                                 : serial::bilstm_losses(params, data);
}

std::vector<std::vector<BioLabel>> bilstm_predict(const bilstm::BilstmParams& params,
                                                  std::span<const bilstm::Instance> data,
                                                  Exec exec) {
  return exec == Exec::kParallel ? parallel::bilstm_predict(params, data)
                                 : serial::bilstm_predict(params, data);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wazobia::kernels
