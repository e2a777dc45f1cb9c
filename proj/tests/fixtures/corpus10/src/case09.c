/* case09 line 1 */
/* case09 line 2 */
/* case09 line 3 */
/* case09 line 4 */
/* case09 line 5 */
/* case09 line 6 */
/* case09 line 7 */
/* case09 line 8 */
/* case09 line 9 */
/* case09 line 10 */
/* case09 line 11 */
/* case09 line 12 */
/* case09 line 13 */
/* case09 line 14 */
/* case09 line 15 */
/* case09 line 16 */
/* case09 line 17 */
/* case09 line 18 */
/* case09 line 19 */
/* case09 line 20 */
/* case09 line 21 */
/* case09 line 22 */
/* case09 line 23 */
/* case09 line 24 */
/* case09 line 25 */
/* case09 line 26 */
/* case09 line 27 */
/* case09 line 28 */
/* case09 line 29 */
/* case09 line 30 */
/* case09 line 31 */
/* case09 line 32 */
/* case09 line 33 */
/* case09 line 34 */
/* case09 line 35 */
/* case09 line 36 */
/* case09 line 37 */
/* case09 line 38 */
/* case09 line 39 */
/* case09 line 40 */
