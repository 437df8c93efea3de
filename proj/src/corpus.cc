#include "jamoeval/corpus.h"

namespace jamoeval {

const std::vector<std::string>& ClinicalWordList() {
  static const std::vector<std::string> words = {
      // Assessment of Phonology and Articulation for Children
      "거북이", "고래", "그네", "꽃", "나무", "눈사람", "단추", "딸기", "머리",
      "모자", "바퀴", "뱀", "병원", "빗", "빨대", "사탕", "색종이", "시소",
      "싸워", "아파", "안경", "양말", "없어", "옥수수", "올라가", "우산",
      "이빨", "장갑", "찢어", "책", "침대", "컵", "토끼", "포도", "햄버거",
      "호랑이", "화장실",
      // Urimal Test of Articulation and Phonology (shared words omitted)
      "가방", "괴물", "귀", "그림", "꼬리", "눈썹", "동물원", "땅콩", "로봇",
      "메뚜기", "못", "바지", "뽀뽀", "세마리", "싸움", "엄마", "연필",
      "자동차", "전화", "짹짹", "참새", "책상", "코끼리", "풍선",
      // Additional test words
      "강아지", "김밥", "나비", "뚜껑", "라면", "버섯", "쓰레기", "양파",
      "종이", "캥거루", "토마토", "헬리콥터",
  };
  return words;
}

}  // namespace jamoeval
