#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "scm/tensor.hpp"

namespace scm {

// 8-bit PNG/TIFF decoding; georeferencing metadata is ignored.
inline Raster read_image(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty())
    throw std::runtime_error("read_image: cannot decode " + path.string());
  Raster out(mat.rows, mat.cols, 3);
  for (int y = 0; y < mat.rows; ++y) {
    const cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < mat.cols; ++x) {
      out.at(y, x, 0) = row[x][2];  // OpenCV is BGR
      out.at(y, x, 1) = row[x][1];
      out.at(y, x, 2) = row[x][0];
    }
  }
  return out;
}

// Labels binarized at > 127.
inline Mask read_mask(const std::filesystem::path& path) {
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (mat.empty())
    throw std::runtime_error("read_mask: cannot decode " + path.string());
  Mask out(mat.rows, mat.cols, 1);
  for (int y = 0; y < mat.rows; ++y) {
    const uint8_t* row = mat.ptr<uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) out.at(y, x) = row[x] > 127 ? 1 : 0;
  }
  return out;
}

inline void write_mask(const std::filesystem::path& path, const Mask& mask) {
  cv::Mat mat(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      mat.at<uint8_t>(y, x) = mask.at(y, x) ? 255 : 0;
  if (!cv::imwrite(path.string(), mat))
    throw std::runtime_error("write_mask: cannot write " + path.string());
}

inline void write_rgb(const std::filesystem::path& path, const Raster& rgb) {
  if (rgb.channels() != 3)
    throw std::invalid_argument("write_rgb: expected 3 channels");
  cv::Mat mat(rgb.height(), rgb.width(), CV_8UC3);
  for (int y = 0; y < rgb.height(); ++y)
    for (int x = 0; x < rgb.width(); ++x)
      mat.at<cv::Vec3b>(y, x) =
          cv::Vec3b(rgb.at(y, x, 2), rgb.at(y, x, 1), rgb.at(y, x, 0));
  if (!cv::imwrite(path.string(), mat))
    throw std::runtime_error("write_rgb: cannot write " + path.string());
}

}  // namespace scm
