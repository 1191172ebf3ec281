// Copyright 2026 The roadaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roadaug/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "roadaug/errors.hpp"

namespace roadaug {

Image load_rgb(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) {
    throw ImageReadError("cannot read image: " + path.string());
  }
  Image out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y, 0) = row[x][2];
      out.at(x, y, 1) = row[x][1];
      out.at(x, y, 2) = row[x][0];
    }
  }
  return out;
}

GrayImage load_gray(const std::filesystem::path& path) {
  cv::Mat gray = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (gray.empty()) {
    throw ImageReadError("cannot read image: " + path.string());
  }
  GrayImage out(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const std::uint8_t* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) out.at(x, y) = row[x];
  }
  return out;
}

void save_png(const std::filesystem::path& path, const Image& image) {
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x) {
      row[x][0] = image.at(x, y, 2);
      row[x][1] = image.at(x, y, 1);
      row[x][2] = image.at(x, y, 0);
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), bgr);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw WriteError("cannot write PNG: " + path.string());
}

void save_gray_png(const std::filesystem::path& path, const GrayImage& image) {
  cv::Mat gray(image.height, image.width, CV_8UC1);
  for (int y = 0; y < image.height; ++y) {
    std::uint8_t* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width; ++x) row[x] = image.at(x, y);
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), gray);
  } catch (const cv::Exception&) {
    ok = false;
  }
  if (!ok) throw WriteError("cannot write PNG: " + path.string());
}

}  // namespace roadaug
